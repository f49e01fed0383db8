"""group-phi test suite"""
