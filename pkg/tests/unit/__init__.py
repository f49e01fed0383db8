"""Unit tests for group-phi"""
