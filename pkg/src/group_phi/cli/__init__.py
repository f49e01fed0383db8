"""Command-line interface for group-phi"""
