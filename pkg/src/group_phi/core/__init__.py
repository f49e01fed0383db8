"""Phi computation: state model, information measures and estimators"""
