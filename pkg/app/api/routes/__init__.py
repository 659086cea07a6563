"""
Routes package initialization.
Import all route modules here to make them available to the application.
""" 