#!/usr/bin/env python3
"""Tables, meaning representations, and reversible tokenization.

A table is parsed from the flat "name[value]" form, linearized back,
and a sentence is delexicalized against it so slot values become
placeholder tokens.
"""

from tabletext import (
    delexicalize,
    detokenize,
    linearize,
    parse_mr,
    relexicalize,
    tokenize,
)

mr = "name[The Mill], eatType[pub], area[riverside], near[Café Rouge]"
table = parse_mr(mr)
print("meaning representation:", mr)
print("parsed slots:")
for slot in table.slots:
    print(f"  {slot.name} = {slot.value}")
print("linearized:", linearize(table))

text = "The Mill is a pub near Café Rouge, in the riverside area."
sentence = tokenize(text)
print("\ntokens:", list(sentence.tokens))
assert detokenize(sentence) == text  # byte-exact round trip

delex = delexicalize(sentence, table)
print("delexicalized:", " ".join(delex.tokens))
print("bindings:", dict(delex.binding))

restored = relexicalize(delex, table)
assert detokenize(restored) == text
print("relexicalized back to the original, byte for byte.")
