"""Sandboxed tree-walking interpreter for generated programs.

Programs run against an image-patch runtime whose perception methods call
out to model backends; no host code is ever executed from program text.
Every statement, expression, and loop iteration consumes one step from a
budget, and oversized values (long sequences, huge integers) abort with a
budget-style failure, so execution always terminates.

Failures map onto a fixed label taxonomy. Host exceptions raised by value
operations keep their Python label (TypeError, ValueError, IndexError,
KeyError, ZeroDivisionError); everything without a dedicated label, such
as budget exhaustion, size aborts, and backend faults, becomes Other.
Only remote-transport trouble escapes; every other failure is folded into
the ExecutionOutcome.
"""

from __future__ import annotations

import math
from typing import Any, Callable, Iterable, Iterator

from ..backends import (
    BackendError,
    BackendSuite,
    Box,
    TransportError,
    complete,
    depth_at,
    detect,
    similarity,
    vqa,
)
from ..types import DecodingParams, Trace, TraceKind
from .outcome import ExecutionOutcome, OutcomeStatus
from .parser import (
    Assign,
    Attribute,
    AugAssign,
    BinOp,
    BoolOp,
    Break,
    Call,
    Compare,
    Continue,
    DictLit,
    Expr,
    ExprStmt,
    FString,
    For,
    If,
    ListComp,
    ListLit,
    Literal,
    Module,
    Name,
    NotOp,
    ParseError,
    Pass,
    Return,
    SliceExpr,
    Stmt,
    Subscript,
    UnaryOp,
    While,
    parse,
)
from .prompt import PromptVariant, variant_functions, variant_methods

DEFAULT_STEP_BUDGET = 100_000
DEFAULT_PROPERTY_THRESHOLD = 0.5

_SEQ_LIMIT = 1_000_000
_INT_BIT_LIMIT = 8_192
_INT_PARSE_LIMIT = 4_300


class InterpreterError(Exception):
    def __init__(self, label: str, message: str):
        super().__init__(message)
        self.label = label


class _Return(Exception):
    def __init__(self, value: Any):
        self.value = value


class _BreakLoop(Exception):
    pass


class _ContinueLoop(Exception):
    pass


class PatchValue:
    """A rectangular region of the image; box None means the full image
    with unknown extent (remote backends cannot report dimensions)."""

    __slots__ = ("image_ref", "box", "parent")

    def __init__(self, image_ref: str, box: Box | None, parent: "PatchValue | None" = None):
        self.image_ref = image_ref
        self.box = box
        self.parent = parent

    def __repr__(self) -> str:
        if self.box is None:
            return "full image"
        left, lower, right, upper = self.box
        return f"image region ({left!r}, {lower!r}, {right!r}, {upper!r})"

    __str__ = __repr__


class _PatchMethod:
    __slots__ = ("patch", "name")

    def __init__(self, patch: PatchValue, name: str):
        self.patch = patch
        self.name = name


class _HostMethod:
    __slots__ = ("value", "name")

    def __init__(self, value: Any, name: str):
        self.value = value
        self.name = name


class _Function:
    """A named callable in the global scope (constructor or helper)."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name


_BUILTINS = (
    "len", "range", "enumerate", "sorted", "min", "max", "abs", "sum",
    "str", "int", "float", "round", "list",
)
_SIZED_CONSUMERS = frozenset({"enumerate", "sorted", "list", "sum", "min", "max"})

_PATCH_ATTRS = frozenset(
    {"left", "lower", "right", "upper", "width", "height", "horizontal_center", "vertical_center"}
)
_ALL_PATCH_METHODS = frozenset(
    {"find", "exists", "verify_property", "simple_query", "crop", "compute_depth", "best_text_match"}
)

_STR_METHODS = frozenset(
    {
        "lower", "upper", "strip", "lstrip", "rstrip", "split", "replace",
        "startswith", "endswith", "join", "count", "find", "index",
        "isdigit", "isalpha", "title", "capitalize",
    }
)
_LIST_METHODS = frozenset(
    {"append", "extend", "pop", "remove", "index", "count", "insert", "reverse", "sort", "copy"}
)
_DICT_METHODS = frozenset({"get", "keys", "values", "items", "pop"})


def _type_name(value: Any) -> str:
    if isinstance(value, PatchValue):
        return "ImagePatch"
    if isinstance(value, (_PatchMethod, _HostMethod)):
        return "method"
    if isinstance(value, _Function):
        return "function"
    return type(value).__name__


def render_answer(value: Any) -> str:
    """Coerce a program's return value into answer text.

    Booleans read as yes/no, None as the empty string, sequences join on
    commas. The bool check precedes the int check because Python bools
    are ints.
    """
    if value is None:
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(render_answer(v) for v in value)
    if isinstance(value, dict):
        return ", ".join(f"{render_answer(k)}: {render_answer(v)}" for k, v in value.items())
    return str(value)


def _box_intersection(a: Box, b: Box) -> Box:
    return (max(a[0], b[0]), max(a[1], b[1]), min(a[2], b[2]), min(a[3], b[3]))


def _box_area(box: Box) -> float:
    return max(0.0, box[2] - box[0]) * max(0.0, box[3] - box[1])


class Interpreter:
    def __init__(
        self,
        suite: BackendSuite,
        image_ref: str,
        *,
        variant: PromptVariant = PromptVariant.TASK_AGNOSTIC,
        property_threshold: float = DEFAULT_PROPERTY_THRESHOLD,
        step_budget: int = DEFAULT_STEP_BUDGET,
        decoding: DecodingParams | None = None,
        trace: Trace | None = None,
    ):
        self.suite = suite
        self.image_ref = image_ref
        self.methods = variant_methods(variant)
        self.functions = variant_functions(variant)
        self.theta = property_threshold
        self.budget = step_budget
        self.decoding = decoding or DecodingParams()
        self.trace = trace
        self.steps = 0
        self.globals: dict[str, Any] = {"ImagePatch": _Function("ImagePatch")}
        for fn in self.functions:
            self.globals[fn] = _Function(fn)
        for builtin in _BUILTINS:
            self.globals[builtin] = _Function(builtin)
        self.locals: dict[str, Any] = {}

    # driver

    def run(self, module: Module, root: PatchValue) -> Any:
        func = module.func
        if not func.params:
            raise InterpreterError(
                "TypeError", f"{func.name}() declares no parameter for the image"
            )
        self.locals[func.params[0].name] = root
        for param in func.params[1:]:
            if param.default is None:
                raise InterpreterError(
                    "TypeError", f"{func.name}() is missing a value for parameter {param.name!r}"
                )
            self.locals[param.name] = self.eval(param.default)
        try:
            self._exec_block(func.body)
        except _Return as ret:
            return ret.value
        return None

    def _step(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise InterpreterError("Other", f"step budget of {self.budget} exhausted")

    # statements

    def _exec_block(self, body: Iterable[Stmt]) -> None:
        for stmt in body:
            self._exec(stmt)

    def _exec(self, node: Stmt) -> None:
        self._step()
        handler = self._STMT_HANDLERS[type(node)]
        handler(self, node)

    def _exec_assign(self, node: Assign) -> None:
        value = self.eval(node.value)
        self._assign_to(node.target, value)

    def _assign_to(self, target: Expr, value: Any) -> None:
        if isinstance(target, Name):
            self.locals[target.id] = value
            return
        assert isinstance(target, Subscript)
        container = self.eval(target.value)
        key = self.eval(target.index)
        if isinstance(container, str):
            raise InterpreterError("TypeError", "'str' object does not support item assignment")
        self._host(lambda: container.__setitem__(key, value))
        if isinstance(container, (list, dict)) and len(container) > _SEQ_LIMIT:
            raise InterpreterError("Other", "container grew past the size limit")

    def _exec_augassign(self, node: AugAssign) -> None:
        if isinstance(node.target, Name):
            current = self._lookup(node.target)
            self.locals[node.target.id] = self._binop(node.op, current, self.eval(node.value))
            return
        assert isinstance(node.target, Subscript)
        container = self.eval(node.target.value)
        key = self.eval(node.target.index)
        current = self._host(lambda: container[key])
        result = self._binop(node.op, current, self.eval(node.value))
        if isinstance(container, str):
            raise InterpreterError("TypeError", "'str' object does not support item assignment")
        self._host(lambda: container.__setitem__(key, result))

    def _exec_exprstmt(self, node: ExprStmt) -> None:
        self.eval(node.value)

    def _exec_return(self, node: Return) -> None:
        raise _Return(self.eval(node.value) if node.value is not None else None)

    def _exec_pass(self, node: Pass) -> None:
        pass

    def _exec_break(self, node: Break) -> None:
        raise _BreakLoop()

    def _exec_continue(self, node: Continue) -> None:
        raise _ContinueLoop()

    def _exec_if(self, node: If) -> None:
        for condition, body in node.branches:
            if self._truthy(self.eval(condition)):
                self._exec_block(body)
                return
        if node.orelse:
            self._exec_block(node.orelse)

    def _exec_for(self, node: For) -> None:
        iterable = self.eval(node.iterable)
        for item in self._iterate(iterable):
            self._step()
            self._bind_targets(node.targets, item)
            try:
                self._exec_block(node.body)
            except _BreakLoop:
                break
            except _ContinueLoop:
                continue

    def _exec_while(self, node: While) -> None:
        while self._truthy(self.eval(node.condition)):
            self._step()
            try:
                self._exec_block(node.body)
            except _BreakLoop:
                break
            except _ContinueLoop:
                continue

    # expressions

    def eval(self, node: Expr) -> Any:
        self._step()
        handler = self._EXPR_HANDLERS[type(node)]
        return handler(self, node)

    def _lookup(self, node: Name) -> Any:
        if node.id in self.locals:
            return self.locals[node.id]
        if node.id in self.globals:
            return self.globals[node.id]
        raise InterpreterError("NameError", f"name {node.id!r} is not defined")

    def _eval_literal(self, node: Literal) -> Any:
        return node.value

    def _eval_fstring(self, node: FString) -> str:
        rendered: list[str] = []
        total = 0
        for part in node.parts:
            if isinstance(part, str):
                text = part
            else:
                value = self.eval(part)
                text = self._host(lambda: str(value))
            total += len(text)
            if total > _SEQ_LIMIT:
                raise InterpreterError("Other", "f-string result grew past the size limit")
            rendered.append(text)
        return "".join(rendered)

    def _eval_listlit(self, node: ListLit) -> list:
        return [self.eval(item) for item in node.items]

    def _eval_dictlit(self, node: DictLit) -> dict:
        out: dict = {}
        for key_node, value_node in node.pairs:
            key = self.eval(key_node)
            value = self.eval(value_node)
            self._host(lambda: out.__setitem__(key, value))
        return out

    def _eval_listcomp(self, node: ListComp) -> list:
        iterable = self.eval(node.iterable)
        out: list = []
        for item in self._iterate(iterable):
            self._step()
            self._bind_targets(node.targets, item)
            if node.condition is not None and not self._truthy(self.eval(node.condition)):
                continue
            out.append(self.eval(node.element))
            if len(out) > _SEQ_LIMIT:
                raise InterpreterError("Other", "comprehension grew past the size limit")
        return out

    def _eval_boolop(self, node: BoolOp) -> Any:
        result: Any = None
        for i, value_node in enumerate(node.values):
            result = self.eval(value_node)
            truthy = self._truthy(result)
            last = i == len(node.values) - 1
            if not last and ((node.op == "and" and not truthy) or (node.op == "or" and truthy)):
                return result
        return result

    def _eval_notop(self, node: NotOp) -> bool:
        return not self._truthy(self.eval(node.operand))

    def _eval_unaryop(self, node: UnaryOp) -> Any:
        operand = self.eval(node.operand)
        if node.op == "-":
            return self._host(lambda: -operand)
        return self._host(lambda: +operand)

    def _eval_binop(self, node: BinOp) -> Any:
        left = self.eval(node.left)
        right = self.eval(node.right)
        return self._binop(node.op, left, right)

    def _eval_compare(self, node: Compare) -> bool:
        left = self.eval(node.left)
        for op, comparator in zip(node.ops, node.comparators):
            right = self.eval(comparator)
            if not self._compare(op, left, right):
                return False
            left = right
        return True

    def _eval_call(self, node: Call) -> Any:
        func = self.eval(node.func)
        args = [self.eval(arg) for arg in node.args]
        if isinstance(func, _Function):
            if func.name == "ImagePatch":
                return self._construct_patch(args)
            if func.name == "distance":
                return self._fn_distance(args)
            if func.name == "llm_query":
                return self._fn_llm_query(args)
            return self._call_builtin(func.name, args)
        if isinstance(func, _PatchMethod):
            return self._call_patch_method(func.patch, func.name, args)
        if isinstance(func, _HostMethod):
            return self._call_host_method(func.value, func.name, args)
        raise InterpreterError("TypeError", f"'{_type_name(func)}' object is not callable")

    def _eval_attribute(self, node: Attribute) -> Any:
        value = self.eval(node.value)
        if isinstance(value, PatchValue):
            return self._patch_attribute(value, node.attr)
        methods: frozenset[str] | None = None
        if isinstance(value, str):
            methods = _STR_METHODS
        elif isinstance(value, list):
            methods = _LIST_METHODS
        elif isinstance(value, dict):
            methods = _DICT_METHODS
        if methods is not None and node.attr in methods:
            return _HostMethod(value, node.attr)
        raise InterpreterError(
            "AttributeError",
            f"'{_type_name(value)}' object has no attribute {node.attr!r}",
        )

    def _eval_subscript(self, node: Subscript) -> Any:
        value = self.eval(node.value)
        if isinstance(node.index, SliceExpr):
            start = self.eval(node.index.start) if node.index.start is not None else None
            stop = self.eval(node.index.stop) if node.index.stop is not None else None
            return self._host(lambda: value[slice(start, stop)])
        index = self.eval(node.index)
        return self._host(lambda: value[index])

    _EXPR_HANDLERS: dict[type, Callable] = {}
    _STMT_HANDLERS: dict[type, Callable] = {}

    # shared semantics

    def _truthy(self, value: Any) -> bool:
        return bool(value)

    def _bind_targets(self, targets: tuple[str, ...], item: Any) -> None:
        if len(targets) == 1:
            self.locals[targets[0]] = item
            return
        if not isinstance(item, (list, tuple)):
            raise InterpreterError(
                "TypeError", f"cannot unpack non-sequence {_type_name(item)} object"
            )
        if len(item) != len(targets):
            raise InterpreterError(
                "ValueError",
                f"unpacking expected {len(targets)} values, got {len(item)}",
            )
        for name, value in zip(targets, item):
            self.locals[name] = value

    def _iterate(self, value: Any) -> Iterator[Any]:
        if isinstance(value, (list, str, tuple, range)):
            return iter(value)
        if isinstance(value, dict):
            return iter(list(value.keys()))
        raise InterpreterError("TypeError", f"'{_type_name(value)}' object is not iterable")

    def _binop(self, op: str, left: Any, right: Any) -> Any:
        self._guard_sequence_op(op, left, right)
        result = self._host(lambda: self._raw_binop(op, left, right))
        self._guard_result(result)
        return result

    @staticmethod
    def _raw_binop(op: str, left: Any, right: Any) -> Any:
        if op == "+":
            return left + right
        if op == "-":
            return left - right
        if op == "*":
            return left * right
        if op == "/":
            return left / right
        if op == "//":
            return left // right
        if op == "%":
            return left % right
        raise AssertionError(op)

    def _guard_sequence_op(self, op: str, left: Any, right: Any) -> None:
        if op == "+" and isinstance(left, (str, list)) and isinstance(right, type(left)):
            if len(left) + len(right) > _SEQ_LIMIT:
                raise InterpreterError("Other", "sequence grew past the size limit")
        if op == "*":
            seq, factor = (left, right) if isinstance(left, (str, list)) else (right, left)
            if isinstance(seq, (str, list)) and isinstance(factor, int) and not isinstance(factor, bool):
                if len(seq) * max(factor, 0) > _SEQ_LIMIT:
                    raise InterpreterError("Other", "sequence grew past the size limit")

    def _guard_result(self, result: Any) -> None:
        if isinstance(result, bool):
            return
        if isinstance(result, int) and result.bit_length() > _INT_BIT_LIMIT:
            raise InterpreterError("Other", "integer grew past the size limit")
        if isinstance(result, (str, list)) and len(result) > _SEQ_LIMIT:
            raise InterpreterError("Other", "sequence grew past the size limit")

    def _compare(self, op: str, left: Any, right: Any) -> bool:
        if op == "==":
            return self._host(lambda: bool(left == right))
        if op == "!=":
            return self._host(lambda: bool(left != right))
        if op == "in":
            return self._host(lambda: left in right)
        if op == "not in":
            return self._host(lambda: left not in right)
        if op == "<":
            return self._host(lambda: bool(left < right))
        if op == "<=":
            return self._host(lambda: bool(left <= right))
        if op == ">":
            return self._host(lambda: bool(left > right))
        return self._host(lambda: bool(left >= right))

    def _host(self, fn: Callable[[], Any]) -> Any:
        """Run a host-level value operation, mapping exceptions to labels."""
        try:
            return fn()
        except InterpreterError:
            raise
        except TypeError as exc:
            raise InterpreterError("TypeError", str(exc)) from exc
        except ValueError as exc:
            raise InterpreterError("ValueError", str(exc)) from exc
        except IndexError as exc:
            raise InterpreterError("IndexError", str(exc)) from exc
        except KeyError as exc:
            raise InterpreterError("KeyError", f"key {exc.args[0]!r} not found") from exc
        except ZeroDivisionError as exc:
            raise InterpreterError("ZeroDivisionError", str(exc)) from exc
        except AttributeError as exc:
            raise InterpreterError("AttributeError", str(exc)) from exc
        except ArithmeticError as exc:
            raise InterpreterError("Other", f"{type(exc).__name__}: {exc}") from exc
        except (MemoryError, RecursionError) as exc:
            raise InterpreterError("Other", type(exc).__name__) from exc
        except RuntimeError as exc:
            raise InterpreterError("Other", str(exc)) from exc

    # builtins

    def _sized_len(self, value: Any) -> int | None:
        try:
            return len(value)
        except TypeError:
            return None
        except OverflowError:
            return _SEQ_LIMIT + 1

    def _call_builtin(self, name: str, args: list) -> Any:
        if name in _SIZED_CONSUMERS and args:
            size = self._sized_len(args[0])
            if size is not None and size > _SEQ_LIMIT:
                raise InterpreterError("Other", f"{name}() input exceeds the size limit")
        if name == "int" and args and isinstance(args[0], str) and len(args[0]) > _INT_PARSE_LIMIT:
            raise InterpreterError("Other", "integer literal exceeds the size limit")
        result = self._host(lambda: self._raw_builtin(name, args))
        self._guard_result(result)
        return result

    @staticmethod
    def _raw_builtin(name: str, args: list) -> Any:
        if name == "len":
            return len(*args)
        if name == "range":
            return range(*args)
        if name == "enumerate":
            return [list(pair) for pair in enumerate(*args)]
        if name == "sorted":
            return sorted(*args)
        if name == "min":
            return min(*args)
        if name == "max":
            return max(*args)
        if name == "abs":
            return abs(*args)
        if name == "sum":
            return sum(*args)
        if name == "str":
            return str(*args)
        if name == "int":
            return int(*args)
        if name == "float":
            return float(*args)
        if name == "round":
            return round(*args)
        if name == "list":
            return list(*args)
        raise AssertionError(name)

    # host value methods

    def _call_host_method(self, value: Any, name: str, args: list) -> Any:
        if name == "join" and args and isinstance(args[0], list):
            total = sum(len(a) for a in args[0] if isinstance(a, str))
            if total > _SEQ_LIMIT:
                raise InterpreterError("Other", "join result exceeds the size limit")
        if name == "replace" and isinstance(value, str) and len(args) >= 2:
            if isinstance(args[0], str) and isinstance(args[1], str) and args[0]:
                grown = len(value) + value.count(args[0]) * len(args[1])
                if grown > _SEQ_LIMIT:
                    raise InterpreterError("Other", "replace result exceeds the size limit")
        result = self._host(lambda: getattr(value, name)(*args))
        if isinstance(value, dict) and name in ("keys", "values"):
            result = list(result)
        elif isinstance(value, dict) and name == "items":
            result = [list(pair) for pair in result]
        self._guard_result(result)
        if isinstance(value, (list, dict)) and len(value) > _SEQ_LIMIT:
            raise InterpreterError("Other", "container grew past the size limit")
        return result

    # patch runtime

    def _patch_attribute(self, patch: PatchValue, attr: str) -> Any:
        if attr in _PATCH_ATTRS:
            if patch.box is None:
                raise InterpreterError(
                    "ValueError",
                    "the extent of the full image is not known to this backend",
                )
            left, lower, right, upper = patch.box
            return {
                "left": left,
                "lower": lower,
                "right": right,
                "upper": upper,
                "width": right - left,
                "height": upper - lower,
                "horizontal_center": (left + right) / 2,
                "vertical_center": (lower + upper) / 2,
            }[attr]
        if attr in self.methods:
            return _PatchMethod(patch, attr)
        raise InterpreterError(
            "AttributeError", f"'ImagePatch' object has no attribute {attr!r}"
        )

    def _construct_patch(self, args: list) -> PatchValue:
        if len(args) == 1:
            if not isinstance(args[0], PatchValue):
                raise InterpreterError(
                    "TypeError", f"ImagePatch() needs an image, got {_type_name(args[0])}"
                )
            return args[0]
        if len(args) == 5:
            if not isinstance(args[0], PatchValue):
                raise InterpreterError(
                    "TypeError", f"ImagePatch() needs an image, got {_type_name(args[0])}"
                )
            return self._crop(args[0], args[1:])
        raise InterpreterError(
            "TypeError", f"ImagePatch() takes 1 or 5 arguments, got {len(args)}"
        )

    def _require_str(self, value: Any, what: str) -> str:
        if not isinstance(value, str):
            raise InterpreterError(
                "TypeError", f"{what} must be a string, got {_type_name(value)}"
            )
        return value

    def _require_number(self, value: Any, what: str) -> float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise InterpreterError(
                "TypeError", f"{what} must be a number, got {_type_name(value)}"
            )
        return float(value)

    def _require_args(self, name: str, args: list, count: int) -> None:
        if len(args) != count:
            raise InterpreterError(
                "TypeError", f"{name}() takes {count} argument(s), got {len(args)}"
            )

    def _crop(self, patch: PatchValue, coords: list) -> PatchValue:
        numbers = [self._require_number(c, "crop coordinate") for c in coords]
        requested: Box = (numbers[0], numbers[1], numbers[2], numbers[3])
        clipped = _box_intersection(requested, patch.box) if patch.box is not None else requested
        if _box_area(clipped) <= 0:
            raise InterpreterError(
                "ValueError", f"crop region {requested} does not overlap the patch"
            )
        return PatchValue(patch.image_ref, clipped, parent=patch)

    def _backend(self, fn: Callable[[], Any]) -> Any:
        try:
            return fn()
        except TransportError:
            raise
        except BackendError as exc:
            raise InterpreterError("Other", f"backend: {exc}") from exc
        except ValueError as exc:
            raise InterpreterError("ValueError", str(exc)) from exc

    def _call_patch_method(self, patch: PatchValue, name: str, args: list) -> Any:
        if name == "find":
            self._require_args("find", args, 1)
            return self._find(patch, self._require_str(args[0], "object name"))
        if name == "exists":
            self._require_args("exists", args, 1)
            return len(self._find(patch, self._require_str(args[0], "object name"))) > 0
        if name == "verify_property":
            self._require_args("verify_property", args, 2)
            self._require_str(args[0], "object name")
            prop = self._require_str(args[1], "property")
            scores = self._backend(
                lambda: similarity(
                    self.suite.similarity, self.image_ref, patch.box, [prop], trace=self.trace
                )
            )
            return scores[0] > self.theta
        if name == "simple_query":
            self._require_args("simple_query", args, 1)
            question = self._require_str(args[0], "question")
            box = None if patch.parent is None else patch.box
            return self._backend(
                lambda: vqa(self.suite.vlm, self.image_ref, question, box=box, trace=self.trace)
            )
        if name == "crop":
            self._require_args("crop", args, 4)
            return self._crop(patch, args)
        if name == "compute_depth":
            self._require_args("compute_depth", args, 0)
            return self._backend(
                lambda: depth_at(self.suite.depth, self.image_ref, patch.box, trace=self.trace)
            )
        if name == "best_text_match":
            self._require_args("best_text_match", args, 1)
            return self._best_text_match(patch, args[0])
        raise AssertionError(name)

    def _find(self, patch: PatchValue, category: str) -> list[PatchValue]:
        boxes = self._backend(
            lambda: detect(self.suite.detector, self.image_ref, category, trace=self.trace)
        )
        children: list[PatchValue] = []
        for box in boxes:
            if patch.box is not None:
                clipped = _box_intersection(box, patch.box)
                if _box_area(clipped) <= 0:
                    continue
                children.append(PatchValue(patch.image_ref, clipped, parent=patch))
            else:
                children.append(PatchValue(patch.image_ref, box, parent=patch))
        return children

    def _best_text_match(self, patch: PatchValue, options: Any) -> str:
        if not isinstance(options, list):
            raise InterpreterError(
                "TypeError", f"option list must be a list, got {_type_name(options)}"
            )
        if not options:
            raise InterpreterError("ValueError", "option list must be non-empty")
        texts = [self._require_str(o, "option") for o in options]
        scores = self._backend(
            lambda: similarity(
                self.suite.similarity, self.image_ref, patch.box, texts, trace=self.trace
            )
        )
        best = 0
        for i in range(1, len(scores)):
            if scores[i] > scores[best]:
                best = i
        return texts[best]

    def _fn_distance(self, args: list) -> float:
        self._require_args("distance", args, 2)
        for arg in args:
            if not isinstance(arg, PatchValue):
                raise InterpreterError(
                    "TypeError", f"distance() needs two patches, got {_type_name(arg)}"
                )
        a, b = args
        if a.box is None or b.box is None:
            raise InterpreterError(
                "ValueError", "distance() needs patches with known coordinates"
            )
        ax, ay = (a.box[0] + a.box[2]) / 2, (a.box[1] + a.box[3]) / 2
        bx, by = (b.box[0] + b.box[2]) / 2, (b.box[1] + b.box[3]) / 2
        return math.hypot(ax - bx, ay - by)

    def _fn_llm_query(self, args: list) -> str:
        self._require_args("llm_query", args, 1)
        question = self._require_str(args[0], "question")
        completion = self._backend(
            lambda: complete(self.suite.instruct_lm, question, self.decoding, trace=self.trace)
        )
        return completion.text.strip()


Interpreter._STMT_HANDLERS = {
    Assign: Interpreter._exec_assign,
    AugAssign: Interpreter._exec_augassign,
    ExprStmt: Interpreter._exec_exprstmt,
    Return: Interpreter._exec_return,
    Pass: Interpreter._exec_pass,
    Break: Interpreter._exec_break,
    Continue: Interpreter._exec_continue,
    If: Interpreter._exec_if,
    For: Interpreter._exec_for,
    While: Interpreter._exec_while,
}

Interpreter._EXPR_HANDLERS = {
    Name: Interpreter._lookup,
    Literal: Interpreter._eval_literal,
    FString: Interpreter._eval_fstring,
    ListLit: Interpreter._eval_listlit,
    DictLit: Interpreter._eval_dictlit,
    ListComp: Interpreter._eval_listcomp,
    BoolOp: Interpreter._eval_boolop,
    NotOp: Interpreter._eval_notop,
    UnaryOp: Interpreter._eval_unaryop,
    BinOp: Interpreter._eval_binop,
    Compare: Interpreter._eval_compare,
    Call: Interpreter._eval_call,
    Attribute: Interpreter._eval_attribute,
    Subscript: Interpreter._eval_subscript,
}


def execute(
    source: str,
    image_ref: str,
    suite: BackendSuite,
    *,
    variant: PromptVariant | str = PromptVariant.TASK_AGNOSTIC,
    property_threshold: float = DEFAULT_PROPERTY_THRESHOLD,
    step_budget: int = DEFAULT_STEP_BUDGET,
    decoding: DecodingParams | None = None,
    trace: Trace | None = None,
    image_extent: tuple[float, float] | None = None,
) -> ExecutionOutcome:
    """Parse and run a program source; always returns an outcome.

    Parse failures report SyntaxError or IndentationError in parse_label.
    Runtime failures carry a taxonomy label. Nothing escapes except
    remote-transport errors, which signal infrastructure trouble rather
    than program behavior.
    """
    variant = PromptVariant(variant)
    try:
        module = parse(source)
    except ParseError as exc:
        label = "IndentationError" if exc.indentation else "SyntaxError"
        if trace is not None:
            trace.record(TraceKind.PARSER_EVENT, status="failed", label=label, line=exc.line)
        return ExecutionOutcome(
            status=OutcomeStatus.PARSE_ERROR, parse_label=label, detail=str(exc)
        )
    if trace is not None:
        trace.record(TraceKind.PARSER_EVENT, status="ok")
    if image_extent is None:
        image_extent = suite.image_extent(image_ref)
    root_box: Box | None = None
    if image_extent is not None:
        root_box = (0.0, 0.0, float(image_extent[0]), float(image_extent[1]))
    root = PatchValue(image_ref, root_box, parent=None)
    interp = Interpreter(
        suite,
        image_ref,
        variant=variant,
        property_threshold=property_threshold,
        step_budget=step_budget,
        decoding=decoding,
        trace=trace,
    )
    try:
        value = interp.run(module, root)
        outcome = ExecutionOutcome(
            status=OutcomeStatus.OK, result=render_answer(value), steps_used=interp.steps
        )
    except InterpreterError as exc:
        outcome = ExecutionOutcome(
            status=OutcomeStatus.RUNTIME_ERROR,
            error_label=exc.label,
            detail=str(exc),
            steps_used=interp.steps,
        )
    except TransportError:
        raise
    except BackendError as exc:
        outcome = ExecutionOutcome(
            status=OutcomeStatus.RUNTIME_ERROR,
            error_label="Other",
            detail=f"backend: {exc}",
            steps_used=interp.steps,
        )
    except RecursionError:
        outcome = ExecutionOutcome(
            status=OutcomeStatus.RUNTIME_ERROR,
            error_label="Other",
            detail="value nesting is too deep",
            steps_used=interp.steps,
        )
    except Exception as exc:  # totality net: no program may crash the harness
        outcome = ExecutionOutcome(
            status=OutcomeStatus.RUNTIME_ERROR,
            error_label="Other",
            detail=f"internal: {type(exc).__name__}: {exc}",
            steps_used=interp.steps,
        )
    if trace is not None:
        trace.record(
            TraceKind.INTERPRETER_STEP,
            status=outcome.status.value,
            steps_used=outcome.steps_used,
        )
    return outcome
