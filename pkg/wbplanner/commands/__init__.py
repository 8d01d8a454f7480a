# Here you define the commands exposed by the command-line interface.

# Import the modules corresponding to the commands.
# To add a new command, duplicate an existing directory and import it here.
from .batch import entry as batch
from .plan import entry as plan
from .replay import entry as replay
from .resample import entry as resample
from .validate import entry as validate

# app.main registers every command in this order.
commands = [
    plan,
    validate,
    replay,
    resample,
    batch,
]


# Assumes you defined a "register" function in each of your modules.
# It adds the command's sub-parser and stores its CMD_ID for dispatch.
def register(subparsers) -> None:
    for command in commands:
        command.register(subparsers)


# Looks a registered command up by its CMD_ID, as stored on the parsed arguments.
def item_by_id(cmd_id: str):
    for command in commands:
        if command.CMD_ID == cmd_id:
            return command
    raise KeyError(f"no command registered as {cmd_id!r}")
