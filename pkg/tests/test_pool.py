import operator

from primeruns.pool import WorkerMap


def test_single_worker_is_builtin_map():
    with WorkerMap(1) as mapper:
        assert mapper is map
    with WorkerMap(0) as mapper:
        assert mapper is map


def test_process_pool_keeps_order():
    xs = list(range(200))
    pool = WorkerMap(2)
    with pool as mapper:
        assert list(mapper(operator.mul, xs, reversed(xs))) == [x * (199 - x) for x in xs]
    assert pool.executor is None
