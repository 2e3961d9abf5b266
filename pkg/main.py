"""Entry point shim — delegates to the slanglag CLI package."""

from __future__ import annotations

from slanglag.cli import main

if __name__ == "__main__":
    main()
