from .cli import Cli

Cli.run()
