"""
Dependencies package initialization.
Import all dependencies here to make them available to the application.
""" 