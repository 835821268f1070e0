#!/usr/bin/env python3
"""Slot-conditioned insertion phrases.

The bundled restaurant rules turn a missing slot into a small phrase
that always carries the slot value (booleans get a fixed wording).
"""

from tabletext import Slot, detokenize, e2e_rules, render, wikibio_rules

rules = e2e_rules()
examples = [
    Slot("area", "riverside"),
    Slot("food", "Chinese"),
    Slot("near", "Café Rouge"),
    Slot("customer rating", "5 out of 5"),
    Slot("pricerange", "cheap"),       # string value
    Slot("pricerange", "£20-25"),      # numeric value, different wording
    Slot("familyfriendly", "yes"),
    Slot("familyfriendly", "no"),
]
print("restaurant rules:")
for slot in examples:
    print(f"  {slot.name}[{slot.value}]  ->  {detokenize(render(rules, slot))}")

print("\nbiography rules:")
bio = wikibio_rules()
for slot in [Slot("birth date", "4 May 1941"), Slot("occupation", "painter"),
             Slot("party", "Whig")]:
    print(f"  {slot.name}[{slot.value}]  ->  {detokenize(render(bio, slot))}")
