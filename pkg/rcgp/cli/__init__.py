from rcgp.cli.data import register_balance, register_gen_data, register_split
from rcgp.cli.decode import register_decode
from rcgp.cli.experiment import register_cv, register_train
from rcgp.cli.report import register_report

COMMANDS = (
    register_gen_data,
    register_split,
    register_balance,
    register_train,
    register_cv,
    register_decode,
    register_report,
)


def register_commands(subparsers) -> None:
    for register in COMMANDS:
        register(subparsers)
