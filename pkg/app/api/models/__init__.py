"""
Models package initialization.
Import all models here to make them available to the application.
""" 