"""
Schemas package initialization.
Import all schemas here to make them available to the application.
""" 