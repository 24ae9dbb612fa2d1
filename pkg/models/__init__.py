"""Models package for attraction games"""
