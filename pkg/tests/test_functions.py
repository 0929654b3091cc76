"""Registry function tests against hand-written tool transcripts.

The interface-extraction expectation is cross-checked by an independent
oracle: grep the unindented header names and drop the loopback entry.
"""

import re

import pytest

from tsgraph.functions import (
    FUNCTIONS,
    FunctionError,
    call_function,
    combine_and,
    combine_or,
    ifconfig_sections,
    lookup_combiner,
    lookup_function,
)

IFCONFIG_CLASSIC = """\
eth0      Link encap:Ethernet  HWaddr 52:54:00:12:34:56
          inet addr:10.0.0.5  Bcast:10.0.0.255  Mask:255.255.255.0
          UP BROADCAST RUNNING MULTICAST  MTU:1500  Metric:1
          RX packets:520 errors:0 dropped:0 overruns:0 frame:0

lo        Link encap:Local Loopback
          inet addr:127.0.0.1  Mask:255.0.0.0
          UP LOOPBACK RUNNING  MTU:65536  Metric:1
"""

IFCONFIG_MODERN = """\
enp3s0: flags=4163<UP,BROADCAST,RUNNING,MULTICAST>  mtu 1500
        inet 192.168.1.7  netmask 255.255.255.0  broadcast 192.168.1.255
        inet6 fe80::5054:ff:fe12:3456  prefixlen 64  scopeid 0x20<link>

wlan0: flags=4099<UP,BROADCAST,MULTICAST>  mtu 1500
        ether 98:54:1b:aa:bb:cc  txqueuelen 1000  (Ethernet)

lo: flags=73<UP,LOOPBACK,RUNNING>  mtu 65536
        inet 127.0.0.1  netmask 255.0.0.0
"""

IFCONFIG_DOWN = """\
eth0      Link encap:Ethernet  HWaddr 52:54:00:12:34:56
          BROADCAST MULTICAST  MTU:1500  Metric:1

lo        Link encap:Local Loopback
          inet addr:127.0.0.1  Mask:255.0.0.0
"""

HOST_OK = """\
server.example.com has address 10.0.0.80
server.example.com has IPv6 address fd00::80
"""

HOST_FAIL = "Host server.example.com not found: 3(NXDOMAIN)\n"


def header_oracle(text):
    names = []
    for line in text.splitlines():
        match = re.match(r"^([A-Za-z][\w@.:-]*?):?\s", line)
        if match and not line[0].isspace():
            names.append(match.group(1))
    return [name for name in names if name != "lo"]


def test_sections_classic_and_modern():
    assert [name for name, _ in ifconfig_sections(IFCONFIG_CLASSIC)] == ["eth0", "lo"]
    assert [name for name, _ in ifconfig_sections(IFCONFIG_MODERN)] == ["enp3s0", "wlan0", "lo"]
    assert ifconfig_sections("") == []


def test_section_blocks_keep_their_lines():
    sections = dict(ifconfig_sections(IFCONFIG_CLASSIC))
    assert "inet addr:10.0.0.5" in sections["eth0"]
    assert "Loopback" in sections["lo"]


@pytest.mark.parametrize(
    "text,expected",
    [
        (IFCONFIG_CLASSIC, "eth0"),
        (IFCONFIG_MODERN, "enp3s0\nwlan0"),
        (IFCONFIG_DOWN, "eth0"),
        ("lo        Link encap:Local Loopback\n", False),
        ("", False),
    ],
)
def test_get_interfaces(text, expected):
    assert call_function("ifconfig-get-interfaces", [text]) == expected
    if expected is not False:
        assert expected.split("\n") == header_oracle(text)


@pytest.mark.parametrize(
    "excluded,text,expected",
    [
        ("lo", IFCONFIG_CLASSIC, "eth0"),
        ("lo", IFCONFIG_MODERN, "enp3s0"),
        ("lo", IFCONFIG_DOWN, False),
        ("lo,enp3s0", IFCONFIG_MODERN, False),
        ("lo", "", False),
    ],
)
def test_check_interfaces(excluded, text, expected):
    assert call_function("ifconfig-check-interfaces", [excluded, text]) == expected


def test_check_interfaces_feeds_get_interfaces():
    # The positive result is parseable as interface headers, so the two
    # functions compose in a chain.
    both = IFCONFIG_CLASSIC + "\neth1      Link encap:Ethernet\n          inet addr:10.0.1.5\n"
    names = call_function("ifconfig-check-interfaces", ["lo", both])
    assert names == "eth0\neth1"
    assert call_function("ifconfig-get-interfaces", [names]) == "eth0\neth1"


def test_validate_host_output():
    assert call_function("validate", [HOST_OK]) == "server.example.com has address 10.0.0.80"
    assert call_function("validate", [HOST_FAIL]) is False
    assert call_function("validate", [""]) is False


@pytest.mark.parametrize(
    "text,expected",
    [
        ("Success 10.0.0.80", "10.0.0.80"),
        ("LastHop 10.0.0.254", "10.0.0.254"),
        ("LastHop none", False),
        ("LastHop 10.0.0.1\nLastHop 10.0.0.254", "10.0.0.254"),
        ("no status here", False),
        ("", False),
    ],
)
def test_last_hop_address(text, expected):
    assert call_function("last-hop-address", [text]) == expected


def test_string_match_and_plumbing():
    assert call_function("string-match", ["ttl", "a\nb ttl=4"]) == "b ttl=4"
    assert call_function("string-match", ["ttl", "nope"]) is False
    assert call_function("identity", ["x"]) == "x"
    assert call_function("length", ["abcd"]) == "4"


def test_unknown_function_and_bad_arity():
    with pytest.raises(FunctionError, match="unknown function 'nope'"):
        call_function("nope", ["x"])
    with pytest.raises(FunctionError, match="identity"):
        call_function("identity", ["a", "b"])
    with pytest.raises(FunctionError, match="unknown combiner"):
        lookup_combiner("xor")


def test_combiners():
    assert combine_or([False, "b", "c"]) == "b"
    assert combine_or([False, False]) is False
    assert combine_or([]) is False
    assert combine_and(["a", "b"]) == "b"
    assert combine_and(["a", False, "b"]) is False
    assert combine_and([]) is False


def test_every_function_documented():
    for spec in FUNCTIONS.values():
        assert spec.doc.strip()
        assert lookup_function(spec.name) is spec
