"""Two-party protocol runs, protocol trees and combinatorial rectangles"""
