"""
Supporting utilities: JSON codecs and localized CLI labels
"""
