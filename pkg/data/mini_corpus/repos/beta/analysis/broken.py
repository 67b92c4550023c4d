"""This file does not parse."""

def broken(:
    return 1
