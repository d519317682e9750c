"""Exact combinatorics of affine Weyl groups, Kottwitz sets and reduction trees."""
