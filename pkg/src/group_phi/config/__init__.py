"""Configuration management for group-phi"""
