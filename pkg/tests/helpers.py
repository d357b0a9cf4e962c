"""Shared scenario builders for the test suite."""

from banditorch.sim import builtin_scenario


def planted_public(**extra):
    """Noise-free public scenario with a unimodal, context-free reward."""
    kw = dict(
        model=dict(kind="planted", target=[0.25, 0.0, 0.0, 0.0, 0.5, 0.5, 0.25],
                   target_weights=[1 / 7] * 7, ram_demand_mib=0.0),
        perf_noise=0.0, usage_noise=0.0, interference=dict(enabled=False), spot=dict(enabled=False),
        static_context=True, alpha=1.0, beta=0.0, workload=dict(generator="constant", baseline=0.5),
    )
    kw.update(extra)
    return builtin_scenario("public-batch", **kw)
