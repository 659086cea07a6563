"""
Repositories package initialization.
Import all repositories here to make them available to the application.
""" 