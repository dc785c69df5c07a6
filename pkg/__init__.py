# reviewsent/__init__.py
# Package initializer
