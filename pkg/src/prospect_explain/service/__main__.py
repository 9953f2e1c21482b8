"""Run the service: python -m prospect_explain.service [host [port]]."""

import sys

import uvicorn

from .app import app


def main() -> None:
    host = sys.argv[1] if len(sys.argv) > 1 else "127.0.0.1"
    port = int(sys.argv[2]) if len(sys.argv) > 2 else 8000
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
