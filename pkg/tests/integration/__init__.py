"""Integration tests for group-phi"""
