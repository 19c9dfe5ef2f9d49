import hypothesis

hypothesis.settings.register_profile(
    "ci", derandomize=True, deadline=None, max_examples=60)
hypothesis.settings.load_profile("ci")
