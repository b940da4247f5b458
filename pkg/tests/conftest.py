import pytest

from wayback_patterns.archiveuri import classify
from wayback_patterns.cleaning import Request
from wayback_patterns.logmodel import LogRecord

BROWSER = "Mozilla/5.0 (Macintosh; Intel Mac OS X 10_6_8) AppleWebKit/535.7 (KHTML, like Gecko) " \
          "Chrome/16.0.912.77 Safari/535.7"
T0 = 1328166000  # 02/Feb/2012:07:00:00 +0000

DIP_EXCERPT = """\
0.100.61.20 & 02/Feb/2012:06:48:24 & http://wayback.archive.org/web/*/http://iyasizuku.com
0.1.134.90 & 02/Feb/2012:07:08:28 & http://web.archive.org/web/19961022174810/http://altavista.com
"""
SLIDE_EXCERPT = """\
0.248.211.54 & 02/Feb/2012:07:04:52 & http://wayback.archive.org/web/20000715000000*/http://google.com
0.248.211.54 & 02/Feb/2012:07:04:59 & http://web.archive.org/web/20000301105534/http://google.com/
0.248.211.54 & 02/Feb/2012:07:05:12 & http://web.archive.org/web/20051101145803/http://www.google.com
0.248.211.54 & 02/Feb/2012:07:05:27 & http://web.archive.org/web/20080730200402/http://www.google.com/
0.248.211.54 & 02/Feb/2012:07:05:38 & http://web.archive.org/web/20110215024256/http://www.google.com/
"""
DIVE_EXCERPT = """\
0.106.160.155 & 02/Feb/2012:07:07:10 & http://wayback.archive.org/web/*/http://my-ru.net
0.106.160.155 & 02/Feb/2012:07:07:18 & http://web.archive.org/web/20100709124643/http://my-ru.net/
0.106.160.155 & 02/Feb/2012:07:07:24 & http://web.archive.org/web/20100709124643/http://my-ru.net/home.php
0.106.160.155 & 02/Feb/2012:07:07:46 & http://web.archive.org/web/20100706170736/http://my-ru.net/carousel.php
"""
SKIM_EXCERPT = """\
0.10.212.177 & 02/Feb/2012:06:45:24 & http://wayback.archive.org/web/*/laquadrature.net
0.10.212.177 & 02/Feb/2012:06:46:10 & http://wayback.archive.org/web/*/parti-du-plaisir.com
0.10.212.177 & 02/Feb/2012:06:46:22 & http://wayback.archive.org/web/*/humanite.fr
"""
SAMPLE_LINE = (
    '0.247.222.86 - - [02/Feb/2012:07:03:46 +0000] "GET http://wayback.archive.org/web/*/http://www.aura.vu '
    'HTTP/1.1" 200 96433 "http://www.archive.org/web/web.php" "' + BROWSER + '"'
)


def record(t=0, uri="http://web.archive.org/web/20100101000000/http://a.com/", ip="1.2.3.4", ua=BROWSER,
           status=200, method="GET", size=1000, referrer=None) -> LogRecord:
    return LogRecord(client_ip=ip, timestamp=T0 + t, method=method, request_uri=uri, status=status,
                     bytes_sent=size, referrer=referrer, user_agent=ua)


def request(t=0, uri="http://web.archive.org/web/20100101000000/http://a.com/", **kw) -> Request:
    return Request(record(t, uri, **kw), classify(uri))


def memento(r="http://a.com/", dt="20100101000000", t=0, **kw) -> Request:
    return request(t, f"http://web.archive.org/web/{dt}/{r}", **kw)


def timemap(r="http://a.com/", t=0, **kw) -> Request:
    return request(t, f"http://wayback.archive.org/web/*/{r}", **kw)


def image(t=0, **kw) -> Request:
    return request(t, "http://web.archive.org/web/20100101000000im_/http://a.com/logo.gif", **kw)


@pytest.fixture
def write_log(tmp_path):
    def _write(text: str, name: str = "in.log") -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


# acceptance criteria register their outcome here; printed at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {title} ({detail})")
