"""
Services package initialization.
Import all services here to make them available to the application.
""" 