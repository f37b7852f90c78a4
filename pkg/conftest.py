import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "estimator-node"))

collect_ignore_glob = ["examples/*"]


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: desk-scale Monte-Carlo reproductions")
