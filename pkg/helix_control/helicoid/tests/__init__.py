from hypothesis import settings

settings.register_profile('helix', deadline=None, max_examples=30)
settings.load_profile('helix')
