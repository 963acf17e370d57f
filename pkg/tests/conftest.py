"""Shared fixtures: the worked 5-address example, a copy-dependency set,
and a synthetic addressing plan with known ground truth."""

from __future__ import annotations

import pytest

from v6scout.addrset import Dataset
from v6scout.pipeline import analyze_dataset

# Five addresses in one /32: positions 1-11 and 17-28 constant, positions
# 12-16 carrying {11111 x3, 31c13, a2f2a}, and the last nybble taking c
# twice and f three times.
FIG4_ADDRESSES = (
    "20010db800011111000000000000000c",
    "20010db800011111000000000000001c",
    "20010db800031c13000000000000010f",
    "20010db8000a2f2a000000000000111f",
    "20010db800011111000000000000100f",
)


@pytest.fixture(scope="session")
def fig4_dataset() -> Dataset:
    return Dataset.from_iterable(FIG4_ADDRESSES, label="fig4")


def make_copy_addresses() -> list[str]:
    """1000 unique addresses where the last nybble copies nybble 16.

    Nybble 16 takes 1/3/5/7 with counts 850/50/50/50; nybbles 25-31 hold a
    running serial so every address is distinct.
    """
    addrs = []
    serial = 0
    for value, count in (("1", 850), ("3", 50), ("5", 50), ("7", 50)):
        for _ in range(count):
            addrs.append(
                "20010db8" + "0000000" + value + "00000000"
                + format(serial, "07x") + value
            )
            serial += 1
    return addrs


@pytest.fixture(scope="session")
def copy_dataset() -> Dataset:
    return Dataset.from_iterable(make_copy_addresses(), label="copy")


@pytest.fixture(scope="session")
def copy_model(copy_dataset):
    return analyze_dataset(copy_dataset)


def make_plan_addresses() -> list[str]:
    """The full 8192-address synthetic plan: one fixed /40, a 64-value site
    field (nybbles 13-14), 16 subnet values (nybbles 15-16), zeroed IID
    except 8 structured host values in the last two nybbles."""
    addrs = []
    for site in range(0x10, 0x50):
        for subnet in range(16):
            for host in range(1, 9):
                addrs.append(
                    "20010db8" + "0001" + format(site, "02x")
                    + format(subnet, "02x") + "0" * 14 + format(host, "02x")
                )
    return addrs


@pytest.fixture(scope="session")
def plan_dataset() -> Dataset:
    return Dataset.from_iterable(make_plan_addresses(), label="plan")
