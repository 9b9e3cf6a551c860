"""Scripted demonstration scenarios with canned completions.

Each scenario pairs an app prompt with the answer every subtask question gets,
so the full pipeline runs deterministically offline. The rule backend serves
those answers directly; record_fixtures routes them through a recording store
to produce an on-disk replay manifest for the service and demos.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from pathlib import Path

from .llm import (
    Backend,
    CompletionRequest,
    CompletionResponse,
    ReplayMiss,
    ReplayMode,
    ReplayStore,
    StoreBackend,
    request_digest,
)
from .model import ObjectModel
from .synthesis import Orchestrator

RESTAURANT_PROMPT = (
    "I want a restaurant management app tracking customers, their reservations, "
    "their orders, and menu items."
)
PET_STORE_PROMPT = (
    "I want a pet store app tracking customers. The pet store app should also "
    "keep the store's inventory of pets and allow customers to buy and sell pets."
)
LIBRARY_PROMPT = (
    "I want a library app to track books. The customers can borrow books and "
    "return books from the library."
)
TASKS_PROMPT = (
    "I want a task management application where users can create and manage "
    "tasks, set deadlines, and receive notifications."
)

# one global field-name -> type-word table; answers outside the offered
# vocabulary deliberately exercise the string fallback (e.g. transaction)
TYPE_ANSWERS = {
    "name": "string",
    "address": "string",
    "phone number": "string",
    "reservation": "reservation",
    "time": "datetime",
    "party size": "int",
    "customer": "customer",
    "menu item": "menu item",
    "total": "float",
    "description": "string",
    "price": "float",
    "number": "int",
    "seat": "string",
    "waiter": "waiter",
    "table": "table",
    "species": "string",
    "breed": "string",
    "transaction": "transaction",
    "email address": "string",
    "pet": "pet",
    "age": "int",
    "color": "string",
    "vaccination": "string",
    "profile": "string",
    "task": "task",
    "notification": "string",
    "deadline": "deadline",
    "subtask": "task",
    "user": "user",
    "date": "datetime",
    "title": "string",
    "author": "string",
    "isbn": "string",
    "book": "book",
    "library card number": "int",
    "genre": "string",
    "publication date": "datetime",
    "review": "string",
    "amount": "float",
    "currency": "string",
    "favorite dish": "string",
    "payment method": "string",
    "employee id": "int",
    "schedule": "string",
    "order": "order",
}


@dataclass
class Scenario:
    name: str
    prompt: str
    st1_initial: str
    st1_followup: str
    st2: str
    st3: dict[str, str] = dc_field(default_factory=dict)
    st6: dict[str, tuple[str, str, str]] = dc_field(default_factory=dict)
    st7: dict[str, str] = dc_field(default_factory=dict)
    st8: dict[str, str] = dc_field(default_factory=dict)


RESTAURANT = Scenario(
    name="restaurant",
    prompt=RESTAURANT_PROMPT,
    st1_initial="A: It has the following tables: customer, reservation, order, menu item.",
    st1_followup="A: It has the following tables: table, waiter.",
    st2="A: This app might have the following tables: table, dish, price.",
    st3={
        "customer": (
            "A: A customer has a name, an address, a phone number, and a list of reservations."
        ),
        "reservation": "A: A reservation has a time, a party size, and a customer.",
        "order": "A: An order has a list of menu items, a total, and a customer.",
        "menu item": "A: A menu item has a name, a description, and a price.",
        "table": "A: A table has a number, a list of seats, and a waiter.",
        "waiter": "A: A waiter has a name and a list of tables.",
        "dish": "A: A dish has a name and a price.",
        "price": "A: A price has an amount and a currency.",
    },
    st6={
        "customer": (
            "A: A customer can make a reservation, place an order, or update their "
            "contact information.",
            "A: A customer can cancel a reservation.",
            "A: The method names are: makeReservation, placeOrder, updateContactInfo, "
            "cancelReservation",
        ),
        "reservation": (
            "A: A reservation can be created or cancelled.",
            "A: A reservation can be moved to a different time.",
            "A: The method names are: create, cancel, reschedule",
        ),
        "order": (
            "A: An order can be placed or paid.",
            "A: An order can have items added to it.",
            "A: The method names are: place, pay, addItem",
        ),
        "menu item": (
            "A: A menu item can be added to an order.",
            "A: A menu item can have its price changed.",
            "A: The method names are: addToOrder, updatePrice",
        ),
        "table": (
            "A: A table can be reserved or freed.",
            "A: A table can be assigned a waiter.",
            "A: The method names are: reserve, free, assignWaiter",
        ),
        "waiter": (
            "A: A waiter can take an order.",
            "A: A waiter can serve a table.",
            "A: The method names are: takeOrder, serveTable",
        ),
        "dish": (
            "A: A dish can be cooked.",
            "A: A dish can be plated.",
            "A: The method names are: cook, plate",
        ),
        "price": (
            "A: A price can be discounted.",
            "A: A price can be converted to another currency.",
            "A: The method names are: applyDiscount, convert",
        ),
    },
    st7={
        "customer": (
            "A: A customer might have an email address, a list of favorite dishes, "
            "and a payment method."
        ),
        "waiter": "A: A waiter might have an employee id, a schedule, and a list of orders.",
    },
    st8={
        "customer": "A: emailReceipt(), viewOrderHistory()",
        "waiter": "A: clockIn(), clockOut()",
    },
)

PET_STORE = Scenario(
    name="pet-store",
    prompt=PET_STORE_PROMPT,
    st1_initial="A: It has the following tables: pet, customer.",
    st1_followup="A: It has the following tables: pet, customer.",
    st2="A: This app might have the following tables: supplier, invoice, shipment.",
    st3={
        "pet": (
            "A: A pet has a name, a species, a breed, a price, a list of customers, "
            "and a list of transactions."
        ),
        "customer": "A: A customer has a name, an email address, and a list of pets.",
    },
    st6={
        "pet": (
            "A: A pet can be bought or returned.",
            "A: A pet can have its information updated.",
            "A: The method names are: buyPet, sellPet, updateInformation",
        ),
        "customer": (
            "A: A customer can buy a pet or sell a pet.",
            "A: A customer can browse the inventory.",
            "A: The method names are: buyPet, sellPet, browseInventory",
        ),
    },
    st7={
        "pet": "A: A pet might have an age, a color, and a list of vaccinations.",
    },
    st8={
        "pet": "A: getAge(), isAvailable()",
    },
)

TASKS = Scenario(
    name="tasks",
    prompt=TASKS_PROMPT,
    st1_initial="A: It has the following tables: user, task, deadline.",
    st1_followup="A: It has the following tables: user, task, deadline.",
    st2="A: This app might have the following tables: project, reminder, label.",
    st3={
        "user": "A: A user has a list of notifications.",
        "task": (
            "A: A task has a name, a description, a deadline, a list of subtasks, "
            "and a list of users."
        ),
        "deadline": "A: A deadline has a name, a description, a date, and a list of tasks.",
    },
    st6={
        "user": (
            "A: A user can create a task or receive a notification.",
            "A: A user can set a deadline.",
            "A: The method names are: createTask, receiveNotification, setDeadline",
        ),
        "task": (
            "A: A task can be created, completed, or deleted.",
            "A: A task can have subtasks added.",
            "A: The method names are: create, complete, addSubtask",
        ),
        "deadline": (
            "A: A deadline can be set or extended.",
            "A: A deadline can notify users.",
            "A: The method names are: set, extend, notifyUsers",
        ),
    },
    st7={
        "user": "A: A user might have a profile, a list of tasks, and a list of notifications.",
    },
    st8={
        "user": "A: deleteAccount(), updateProfile()",
    },
)

LIBRARY = Scenario(
    name="library",
    prompt=LIBRARY_PROMPT,
    st1_initial="A: It has the following tables: book, customer, library.",
    st1_followup="A: It has the following tables: book, customer, library.",
    st2="A: This app might have the following tables: librarian, shelf, fine.",
    st3={
        "book": "A: A book has a title, an author, an isbn, and a list of customers.",
        "customer": "A: A customer has a name, a list of books, and a library card number.",
        "library": "A: A library has a name, an address, and a list of books.",
    },
    st6={
        "book": (
            "A: A book can be borrowed or returned.",
            "A: A book can be reserved.",
            "A: The method names are: borrow, return, reserve",
        ),
        "customer": (
            "A: A customer can borrow a book or return a book.",
            "A: A customer can search for a book.",
            "A: The method names are: borrowBook, searchBook, returnBook",
        ),
        "library": (
            "A: A library can lend books.",
            "A: A library can add new books.",
            "A: The method names are: lendBook, addBook",
        ),
    },
    st7={
        "book": "A: A book might have a genre, a publication date, and a list of reviews.",
    },
    st8={
        "customer": "A: checkoutBook(), reserveBook(), renewBook()",
    },
)

ALL_SCENARIOS = (RESTAURANT, PET_STORE, TASKS, LIBRARY)

_Q_ST1_INITIAL = "Q: What tables does this application have?"
_Q_ST1_FOLLOWUP = "Q: What other tables does this application have?"
_Q_ST2 = "Q: What are three other tables this app might have?"
_Q_ST3 = re.compile(r"^Q: What does an? (.+) have\?$")
_Q_ST4 = re.compile(r'^Q: What is the data type of an attribute named "(.+)"\?$')
_Q_ST6_FIRST = re.compile(r"^Q: What can an? (.+) do\?$")
_Q_ST6_ELSE = re.compile(r"^Q: What else can an? (.+) do\?$")
_Q_ST6_NAMES = "Q: What are the method names for these actions?"
_Q_ST6_ANY = re.compile(r"^Q: What can an? (.+) do\?$", re.MULTILINE)
_Q_ST7 = re.compile(r"^Q: What are 3 other things an? (.+) might have\?$")
_Q_ST8 = re.compile(r"^Q: What other methods does the (.+) object have\?$")


class ScenarioBackend:
    """Answers rendered prompts from the scenario scripts; fully offline."""

    provider = "scenario"

    def __init__(self, scenarios=ALL_SCENARIOS, types=TYPE_ANSWERS):
        self.scenarios = list(scenarios)
        self.types = dict(types)
        self.calls = 0

    def _scenario_for(self, prompt: str) -> Scenario:
        best = None
        best_pos = -1
        for sc in self.scenarios:
            pos = prompt.rfind(sc.prompt)
            if pos > best_pos:
                best, best_pos = sc, pos
        if best is None or best_pos < 0:
            raise ReplayMiss(request_digest(CompletionRequest(prompt=prompt)), prompt[:48])
        return best

    def _answer(self, prompt: str) -> str:
        last = prompt.rsplit("\n", 1)[-1]
        m = _Q_ST4.match(last)
        if m:
            return "A: " + self.types.get(m.group(1), "string")
        sc = self._scenario_for(prompt)
        if last == _Q_ST1_INITIAL:
            return sc.st1_initial
        if last == _Q_ST1_FOLLOWUP:
            return sc.st1_followup
        if last == _Q_ST2:
            return sc.st2
        m = _Q_ST3.match(last)
        if m and m.group(1) in sc.st3:
            return sc.st3[m.group(1)]
        m = _Q_ST6_FIRST.match(last)
        if m and m.group(1) in sc.st6:
            return sc.st6[m.group(1)][0]
        m = _Q_ST6_ELSE.match(last)
        if m and m.group(1) in sc.st6:
            return sc.st6[m.group(1)][1]
        if last == _Q_ST6_NAMES:
            # the object under discussion is the last first-turn question asked
            asked = _Q_ST6_ANY.findall(prompt)
            if asked and asked[-1] in sc.st6:
                return sc.st6[asked[-1]][2]
        m = _Q_ST7.match(last)
        if m and m.group(1) in sc.st7:
            return sc.st7[m.group(1)]
        m = _Q_ST8.match(last)
        if m and m.group(1) in sc.st8:
            return sc.st8[m.group(1)]
        raise ReplayMiss(
            request_digest(CompletionRequest(prompt=prompt)), f"unscripted question {last!r}"
        )

    def complete(self, req: CompletionRequest) -> CompletionResponse:
        self.calls += 1
        return CompletionResponse(text=self._answer(req.prompt), latency=0.0, provider=self.provider)


def scenario_backend() -> ScenarioBackend:
    return ScenarioBackend()


def _drive_all_flows(backend: Backend) -> None:
    """Exercise every scripted button path once, so a recording wrapper sees
    every digest the demos and tests will need."""
    orch = Orchestrator(backend)

    m = ObjectModel(prompt=RESTAURANT_PROMPT)
    orch.run_begin(m)
    orch.run_auto_add_object(m)  # drafting phase variant
    orch.run_generate_fields_and_methods(m)
    orch.run_auto_add_object(m)  # full phase variant (answers are all taken)
    orch.run_auto_add_field(m, "customer")
    orch.run_auto_add_field(m, "waiter")
    orch.run_auto_add_method(m, "customer")
    orch.run_auto_add_method(m, "waiter")

    # restaurant without the drafting-phase auto-add, so the full-phase
    # auto-add has fresh names (dish, price) to flesh out
    m = ObjectModel(prompt=RESTAURANT_PROMPT)
    orch.run_begin(m)
    orch.run_generate_fields_and_methods(m)
    orch.run_auto_add_object(m)

    # the canonical demo sequence: straight from generate to the per-object
    # buttons, in the order the walkthrough clicks them
    m = ObjectModel(prompt=RESTAURANT_PROMPT)
    orch.run_begin(m)
    orch.run_generate_fields_and_methods(m)
    orch.run_auto_add_field(m, "customer")
    orch.run_auto_add_method(m, "waiter")
    orch.run_auto_add_method(m, "customer")

    m = ObjectModel(prompt=PET_STORE_PROMPT)
    orch.run_begin(m)
    orch.run_generate_fields_and_methods(m)
    orch.run_auto_add_object(m)
    orch.run_auto_add_field(m, "pet")
    orch.run_auto_add_method(m, "pet")

    m = ObjectModel(prompt=TASKS_PROMPT)
    orch.run_begin(m)
    orch.run_generate_fields_and_methods(m)
    orch.run_auto_add_field(m, "user")
    orch.run_auto_add_method(m, "user")

    m = ObjectModel(prompt=LIBRARY_PROMPT)
    orch.run_begin(m)
    orch.run_generate_fields_and_methods(m)
    orch.run_auto_add_method(m, "customer")
    orch.run_auto_add_field(m, "book")


def record_fixtures(root: str | Path) -> Path:
    """Write a replay manifest under root covering every scripted flow."""
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    store = ReplayStore(root=root, mode=ReplayMode.RECORD)
    _drive_all_flows(StoreBackend(store, ScenarioBackend()))
    return store.manifest_path
