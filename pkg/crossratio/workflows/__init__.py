"""
Command pipelines and their steps.
"""
