"""Shared record of acceptance outcomes, printed at the end of the session."""

RESULTS = {}


def format_line(number):
    ok, title, detail = RESULTS[number]
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} -- {detail}"


def record(number, title, ok, detail):
    RESULTS[number] = (bool(ok), title, detail)
    print(format_line(number))
    assert ok, detail
