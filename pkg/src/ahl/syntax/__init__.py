from ahl.syntax.ast import *  # noqa: F401,F403
from ahl.syntax.parser import (  # noqa: F401
    Program,
    parse_assertion,
    parse_expr,
    parse_file,
    parse_program,
    parse_stmt,
    tokenize,
)
from ahl.syntax.printer import render, render_assertion, render_expr, render_stmt  # noqa: F401
from ahl.syntax.sorts import check_assertion, check_expr, check_stmt  # noqa: F401
