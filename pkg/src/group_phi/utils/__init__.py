"""Utility functions for group-phi"""
