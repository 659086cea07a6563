"""
App package initialization.
""" 