# Copyright 2026 The commbench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Length-prefixed JSON framing used by runner protocol v1.

A frame is the payload size in ASCII decimal, a newline, then that many bytes
of compact UTF-8 JSON holding one object.
"""

import json

PROTOCOL_VERSION = 1
MAX_HEADER_DIGITS = 10
MAX_MESSAGE_BYTES = 1 << 30


class ProtocolError(Exception):
    """The peer sent something that is not a valid protocol message."""


def encode(message):
    payload = json.dumps(message, separators=(",", ":"), allow_nan=False).encode("utf-8")
    return str(len(payload)).encode("ascii") + b"\n" + payload


def write_message(stream, message):
    stream.write(encode(message))
    stream.flush()


def read_message(stream):
    """Returns the next message, or None on a clean end of stream."""
    header = bytearray()
    while True:
        c = stream.read(1)
        if not c:
            if header:
                raise ProtocolError("stream ended inside a length header")
            return None
        if c == b"\n":
            break
        header += c
        if len(header) > MAX_HEADER_DIGITS:
            raise ProtocolError("malformed length header")
    if not header or not header.isdigit():
        raise ProtocolError(f"malformed length header {bytes(header)!r}")
    size = int(header)
    if size > MAX_MESSAGE_BYTES:
        raise ProtocolError("message length exceeds limit")
    payload = bytearray()
    while len(payload) < size:
        chunk = stream.read(size - len(payload))
        if not chunk:
            raise ProtocolError(f"stream ended after {len(payload)} of {size} payload bytes")
        payload += chunk
    try:
        message = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as e:
        raise ProtocolError(f"payload is not JSON: {e}") from None
    if not isinstance(message, dict):
        raise ProtocolError("payload is not a JSON object")
    return message
