"""mltc - symbolic kernel for many-to-one computads. Command-line entry point."""
import argparse
import copy
import json
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Callable, Dict, List, Optional

import yaml
from dotenv import load_dotenv

from src.cells import (
    CODOMAIN,
    DOMAIN,
    INDETS,
    OBJECTS,
    Cell,
    boundary,
    cell_record,
    compose,
    iterated_boundary,
    occurrences,
    render,
)
from src.deduction import check_proof_text
from src.errors import KernelError, PresentationError, ProofError, TermSyntaxError
from src.laws import LawChecker
from src.multitopic import (
    MultitopicSet,
    apply_morphism,
    build_morphism,
    computad_of_mlt,
    enumerate_cells,
    enumerate_pasting_diagrams,
    export_mlt,
    parse_map,
    parse_map_flags,
)
from src.oracle import ClosureOracle
from src.presentation import Presentation, load_presentation, validate_presentation
from src.terms import (
    LANG_C,
    LANG_M,
    decide_equal,
    eval_term,
    parse_cell,
    parse_term,
)

logger = logging.getLogger(__name__)

LANG_CELL = 'cell'

DEFAULT_CONFIG = {
    'logging': {
        'level': 'WARNING',
        'file': '',
        'max_bytes': 10485760,  # 10MB
        'backup_count': 5,
    },
    'enumeration': {
        'max_indets': 4,
        'payload_max_indets': 2,
    },
    'oracle': {
        'size_bound': 5,
        'identity_max_indets': 2,
        'escape_raise': 2,
        'max_terms': 500000,
    },
    'verify': {
        'seed': 7,
        'max_indets': 3,
        'samples': 200,
        'sample_max_indets': 8,
        'proofs': 100,
        'mutations': 100,
        'proof_steps': 3,
        'proof_term_size': 5,
    },
    'output': {
        'json_indent': 2,
    },
}

_HANDLER_MARK = '_mltc_handler'


class UsageError(Exception):
    """Flags that parse but do not fit the verb."""


def setup_logging(config: dict):
    """Setup logging configuration.

    Handlers installed by an earlier call are replaced, never stacked. The
    console handler writes to stderr so that command output on stdout stays
    deterministic.

    Args:
        config: Application configuration
    """
    log_config = config.get('logging', {})
    log_level = log_config.get('level', 'WARNING')
    log_file = log_config.get('file', '')
    max_bytes = log_config.get('max_bytes', 10485760)
    backup_count = log_config.get('backup_count', 5)

    formatter = logging.Formatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )

    root_logger = logging.getLogger()
    for handler in list(root_logger.handlers):
        if getattr(handler, _HANDLER_MARK, False):
            root_logger.removeHandler(handler)
            handler.close()

    handlers: List[logging.Handler] = []
    if log_file:
        log_dir = os.path.dirname(log_file)
        if log_dir:
            os.makedirs(log_dir, exist_ok=True)
        handlers.append(RotatingFileHandler(
            log_file,
            maxBytes=max_bytes,
            backupCount=backup_count
        ))
    handlers.append(logging.StreamHandler(sys.stderr))

    for handler in handlers:
        handler.setFormatter(formatter)
        setattr(handler, _HANDLER_MARK, True)
        root_logger.addHandler(handler)
    root_logger.setLevel(getattr(logging, str(log_level).upper(), logging.WARNING))

    # Grammar construction is chatty at DEBUG
    logging.getLogger('lark').setLevel(logging.WARNING)


def _merge(base: dict, override: dict) -> dict:
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_config(path: Optional[str] = None) -> dict:
    """Load configuration from YAML file over the built-in defaults.

    The file is ``path``, else ``$MLTC_CONFIG`` (a ``.env`` file may set it),
    else ``config/config.yaml``. A missing file leaves the defaults.

    Returns:
        Configuration dictionary
    """
    load_dotenv()
    config_path = Path(path or os.environ.get('MLTC_CONFIG') or 'config/config.yaml')

    if not config_path.exists():
        return copy.deepcopy(DEFAULT_CONFIG)

    with open(config_path, 'r', encoding='utf-8') as f:
        loaded = yaml.safe_load(f) or {}

    return _merge(DEFAULT_CONFIG, loaded)


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

VERBS = (
    'check', 'eval', 'eq', 'compose', 'boundary', 'occurrences', 'enumerate',
    'check-proof', 'oracle', 'morphism-apply', 'export', 'verify', 'help',
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='mltc',
        description='Symbolic kernel for many-to-one computads',
        add_help=False,
    )
    parser.add_argument('verb', nargs='?', choices=VERBS)
    parser.add_argument('inputs', nargs='*', help="terms, cells or files; '-' reads stdin")
    parser.add_argument('-p', '--presentation')
    parser.add_argument('--lang', choices=(LANG_C, LANG_M, LANG_CELL), default=LANG_C)
    parser.add_argument('--json', action='store_true')
    parser.add_argument('-n', '--dim', type=int)
    parser.add_argument('-k', type=int)
    parser.add_argument('--max-indets', type=int)
    parser.add_argument('--many-to-one-only', action='store_true')
    parser.add_argument('--seed', type=int)
    parser.add_argument('--map', action='append', default=[])
    parser.add_argument('--map-file')
    parser.add_argument('--target')
    parser.add_argument('--kind', choices=(INDETS, OBJECTS), default=INDETS)
    parser.add_argument('--size-bound', type=int)
    parser.add_argument('-h', '--help', action='store_true')
    return parser


class Command:
    """One parsed invocation: flags, presentation, output sinks."""

    def __init__(self, args: argparse.Namespace, config: dict, stdin, stdout):
        self.args = args
        self.config = config
        self.stdin = stdin
        self.stdout = stdout
        self._presentation: Optional[Presentation] = None

    @property
    def presentation(self) -> Presentation:
        if self._presentation is None:
            if not self.args.presentation:
                raise UsageError(f"{self.args.verb} needs -p/--presentation")
            self._presentation = load_presentation(self.args.presentation)
        return self._presentation

    def out(self, text: str = '') -> None:
        print(text, file=self.stdout)

    def dump(self, payload) -> None:
        indent = self.config.get('output', {}).get('json_indent', 2)
        self.out(json.dumps(payload, indent=indent, ensure_ascii=False))

    def inputs(self) -> List[str]:
        """Positional inputs with '-' expanded to the non-blank stdin lines."""
        items = []
        for item in self.args.inputs:
            if item == '-':
                items.extend(line.strip() for line in self.stdin.read().splitlines() if line.strip())
            else:
                items.append(item)
        return items

    def operands(self, count: Optional[int] = None) -> List[str]:
        items = self.inputs()
        if count is not None and len(items) != count:
            raise UsageError(f"{self.args.verb} takes {count} operands, got {len(items)}")
        if not items:
            raise UsageError(f"{self.args.verb} needs at least one operand")
        return items

    def term(self, text: str):
        return parse_term(text, self.presentation, self.args.lang, self.args.dim)

    def cell(self, text: str) -> Cell:
        if self.args.lang == LANG_CELL:
            u = parse_cell(text, self.presentation)
            if self.args.dim is not None and u.dim != self.args.dim:
                raise UsageError(f"{text} has dimension {u.dim}, expected {self.args.dim}")
            return u
        return eval_term(self.term(text), self.presentation)

    def read_file(self, path: str) -> str:
        if path == '-':
            return self.stdin.read()
        try:
            with open(path, 'r', encoding='utf-8') as f:
                return f.read()
        except UnicodeDecodeError as e:
            raise TermSyntaxError(f"{path}: not UTF-8 text (byte {e.start})") from e


# ---------------------------------------------------------------------------
# Verbs
# ---------------------------------------------------------------------------

def run_check(cmd: Command) -> int:
    """Validate the presentation."""
    try:
        p = cmd.presentation
        violations = validate_presentation(p)
    except TermSyntaxError:
        raise
    except PresentationError as e:
        if cmd.args.json:
            cmd.dump({'presentation': cmd.args.presentation, 'valid': False,
                      'violations': [{'indet': None, 'message': str(e)}]})
        else:
            cmd.out(f"invalid: {e}")
        return 1

    if cmd.args.json:
        cmd.dump({
            'presentation': p.name,
            'valid': not violations,
            'levels': [len(level) for level in p.levels],
            'violations': [{'indet': v.indet, 'message': v.message} for v in violations],
        })
    elif violations:
        for v in violations:
            cmd.out(f"invalid: {v}")
    else:
        sizes = '+'.join(str(len(level)) for level in p.levels)
        cmd.out(f"valid: {p.name} ({len(p.levels)} levels, {sizes} indets)")
    return 1 if violations else 0


def run_eval(cmd: Command) -> int:
    cells = [cmd.cell(text) for text in cmd.operands()]
    if cmd.args.json:
        cmd.dump([{'rendering': render(u), **cell_record(u)} for u in cells])
    else:
        for u in cells:
            cmd.out(render(u))
    return 0


def run_eq(cmd: Command) -> int:
    left, right = cmd.operands(2)
    if cmd.args.lang == LANG_CELL:
        equal = cmd.cell(left) == cmd.cell(right)
    else:
        equal = decide_equal(cmd.term(left), cmd.term(right), cmd.presentation)
    if cmd.args.json:
        cmd.dump({'equal': equal})
    else:
        cmd.out('equal' if equal else 'not equal')
    return 0 if equal else 1


def run_compose(cmd: Command) -> int:
    left, right = (cmd.cell(text) for text in cmd.operands(2))
    k = cmd.args.k
    if k is None:
        k = max(left.dim, right.dim) - 1
    u, _ = compose(cmd.presentation, left, k, right)
    if cmd.args.json:
        cmd.dump({'rendering': render(u), **cell_record(u)})
    else:
        cmd.out(render(u))
    return 0


def run_boundary(cmd: Command) -> int:
    p = cmd.presentation
    results = []
    for text in cmd.operands():
        u = cmd.cell(text)
        if cmd.args.k is None:
            d, c = boundary(p, u)
        else:
            d = iterated_boundary(p, u, cmd.args.k, DOMAIN)
            c = iterated_boundary(p, u, cmd.args.k, CODOMAIN)
        results.append((u, d, c))
    if cmd.args.json:
        cmd.dump([
            {'cell': render(u), 'domain': render(d), 'codomain': render(c)}
            for u, d, c in results
        ])
    else:
        for _, d, c in results:
            cmd.out(f"domain: {render(d)}")
            cmd.out(f"codomain: {render(c)}")
    return 0


def run_occurrences(cmd: Command) -> int:
    found = [(cmd.cell(text), cmd.args.kind) for text in cmd.operands()]
    if cmd.args.json:
        cmd.dump([
            {'cell': render(u), 'kind': kind, 'occurrences': list(occurrences(u, kind))}
            for u, kind in found
        ])
    else:
        for u, kind in found:
            cmd.out(f"({', '.join(occurrences(u, kind))})")
    return 0


def _bound(cmd: Command) -> int:
    if cmd.args.max_indets is not None:
        return cmd.args.max_indets
    return cmd.config.get('enumeration', {}).get('max_indets', 4)


def run_enumerate(cmd: Command) -> int:
    S = MultitopicSet(cmd.presentation, cmd.config)
    n = 1 if cmd.args.dim is None else cmd.args.dim
    bound = _bound(cmd)
    if cmd.args.many_to_one_only:
        cells = enumerate_pasting_diagrams(S, n, bound)
    else:
        cells = enumerate_cells(S, n, bound)
    if cmd.args.json:
        cmd.dump({
            'dim': n,
            'max_indets': bound,
            'cells': [{'rendering': render(u), **cell_record(u)} for u in cells],
        })
    else:
        for u in cells:
            cmd.out(render(u))
    logger.info(f"✅ Enumerated {len(cells)} cells of dimension {n}")
    return 0


def run_check_proof(cmd: Command) -> int:
    if len(cmd.args.inputs) != 1:
        raise UsageError("check-proof takes one proof file ('-' for stdin)")
    path = cmd.args.inputs[0]
    language = LANG_M if cmd.args.lang == LANG_M else LANG_C
    text = cmd.read_file(path)
    try:
        eq = check_proof_text(text, cmd.presentation, language)
    except ProofError as e:
        if cmd.args.json:
            cmd.dump({'valid': False, 'error': str(e), 'step': e.step, 'line': e.line})
        else:
            cmd.out(f"invalid proof: {e}")
        return 1
    if cmd.args.json:
        cmd.dump({'valid': True, 'equation': str(eq), 'dim': eq.dim})
    else:
        cmd.out(f"proved: {eq}")
    return 0


def run_oracle(cmd: Command) -> int:
    oracle_config = cmd.config.get('oracle', {})
    n = 1 if cmd.args.dim is None else cmd.args.dim
    size_bound = cmd.args.size_bound or oracle_config.get('size_bound', 5)
    language = LANG_M if cmd.args.lang == LANG_M else LANG_C
    partition = ClosureOracle(cmd.presentation, cmd.config).partition(n, size_bound, language)
    if cmd.args.json:
        cmd.dump({
            'language': partition.language,
            'dim': partition.dim,
            'size_bound': partition.size_bound,
            'blocks': partition.blocks,
        })
    else:
        for block in partition.blocks:
            cmd.out(' = '.join(block))
    return 0


def run_morphism_apply(cmd: Command) -> int:
    if not cmd.args.target:
        raise UsageError("morphism-apply needs --target")
    images: Dict[str, str] = {}
    if cmd.args.map_file:
        images.update(parse_map(cmd.read_file(cmd.args.map_file)))
    images.update(parse_map_flags(cmd.args.map))

    S = MultitopicSet(cmd.presentation, cmd.config)
    T = MultitopicSet(load_presentation(cmd.args.target), cmd.config)
    m = build_morphism(S, T, images)
    results = [(text, apply_morphism(m, cmd.cell(text))) for text in cmd.operands()]
    if cmd.args.json:
        cmd.dump([{'input': text, 'image': render(u)} for text, u in results])
    else:
        for _, u in results:
            cmd.out(render(u))
    return 0


def run_export(cmd: Command) -> int:
    p = cmd.presentation
    S = MultitopicSet(p, cmd.config)
    n = p.top_dim if cmd.args.dim is None else cmd.args.dim
    export = export_mlt(S, n, _bound(cmd))
    export['presentation'] = p.name
    cmd.dump(export)
    return 0


def run_verify(cmd: Command) -> int:
    """Run every law suite plus the structural round trips."""
    p = cmd.presentation
    config = cmd.config
    if cmd.args.max_indets is not None:
        config = _merge(config, {'verify': {'max_indets': cmd.args.max_indets}})

    results = {'presentation': [str(v) for v in validate_presentation(p)]}
    round_trip = computad_of_mlt(MultitopicSet(p, config))
    results['equivalence'] = [] if round_trip == p else [f"computad_of_mlt gave {round_trip!r}"]
    for suite, report in LawChecker(p, config, cmd.args.seed).run().items():
        results[suite] = [str(v) for v in report]

    failed = sum(len(report) for report in results.values())
    if cmd.args.json:
        cmd.dump({'presentation': p.name, 'ok': not failed, 'suites': results})
    else:
        for suite, report in results.items():
            cmd.out(f"{suite}: {'ok' if not report else f'{len(report)} violations'}")
            for line in report:
                cmd.out(f"  {line}")
    status = '✅' if not failed else '❌'
    logger.info(f"{status} verify {p.name}: {failed} violations")
    return 1 if failed else 0


def print_usage(stream=None):
    """Print usage information."""
    print("""
mltc - Usage

Commands:
  mltc check -p F.cmp                     Validate a presentation
  mltc eval -p F.cmp TERM...              Evaluate terms to canonical cells
  mltc eq -p F.cmp TERM TERM              Decide whether two terms are equal
  mltc compose -p F.cmp -k K CELL CELL    Compose two cells along dimension K
  mltc boundary -p F.cmp [-k K] TERM...   Domain and codomain (iterated with -k)
  mltc occurrences -p F.cmp TERM...       Indet (or --kind objects) occurrences
  mltc enumerate -p F.cmp -n N            Enumerate cells of dimension N
  mltc check-proof -p F.cmp FILE.prf      Check a proof file
  mltc oracle -p F.cmp -n N               Dump the closure partition of terms
  mltc morphism-apply -p F.cmp --target G.cmp [--map f=g] TERM...
  mltc export -p F.cmp [-n N]             Export the multitopic set as JSON
  mltc verify -p F.cmp [--seed S]         Run every law suite
  mltc help                               Show this help message

Flags:
  --lang c|m|cell     Term language of the operands (default c)
  --json              Structured output
  --max-indets B      Indet bound for enumerations
  --many-to-one-only  Enumerate pasting diagrams only
  --size-bound S      Node bound for the oracle
  -                   Read operands from stdin, one per line

Examples:
  mltc eq -p f1.cmp "((x *0 y) *0 x)" "(x *0 (y *0 x))"
  mltc eval -p f2.cmp "((Y *1 Y1) *0 (X *1 X1))"

For more information, see README.md
    """, file=stream or sys.stdout)


HANDLERS: Dict[str, Callable[[Command], int]] = {
    'check': run_check,
    'eval': run_eval,
    'eq': run_eq,
    'compose': run_compose,
    'boundary': run_boundary,
    'occurrences': run_occurrences,
    'enumerate': run_enumerate,
    'check-proof': run_check_proof,
    'oracle': run_oracle,
    'morphism-apply': run_morphism_apply,
    'export': run_export,
    'verify': run_verify,
}


def run(argv: List[str], config: Optional[dict] = None, stdin=None, stdout=None) -> int:
    """Execute one invocation and return its exit status.

    Args:
        argv: Arguments without the program name
        config: Configuration; loaded from file when omitted
        stdin: Stream read for '-' operands (default sys.stdin)
        stdout: Stream receiving command output (default sys.stdout)

    Returns:
        0 on success, 1 on a negative decision, 2 on usage or input errors
    """
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    config = _merge(DEFAULT_CONFIG, config) if config is not None else load_config()
    setup_logging(config)

    parser = build_parser()
    try:
        # Operands may follow -p and friends
        args = parser.parse_intermixed_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2

    if args.help or args.verb in (None, 'help'):
        print_usage(stdout)
        return 2 if args.verb is None and not args.help else 0

    cmd = Command(args, config, stdin, stdout)
    try:
        return HANDLERS[args.verb](cmd)
    except ProofError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (KernelError, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except RecursionError:
        print("error: input nested too deeply", file=sys.stderr)
        return 2


def main():
    """Main entry point."""
    if len(sys.argv) < 2:
        print_usage()
        sys.exit(2)
    sys.exit(run(sys.argv[1:]))


if __name__ == '__main__':
    main()
