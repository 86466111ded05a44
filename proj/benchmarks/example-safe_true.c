// Automaton with state s cycling through 1..4; x1 and x2 are incremented
// alternately and must agree whenever s returns to 1.
int s;
int x1;
int x2;
int c;
s = 1;
x1 = 0;
x2 = 0;
c = nondet();
while (c != 0) {
  if (s == 1) {
    x1 = x1 + 1;
  } else {
    if (s == 2) {
      x2 = x2 + 1;
    }
  }
  s = s + 1;
  if (s == 5) {
    s = 1;
  }
  assert(!(s == 1 && x1 != x2));
  c = nondet();
}
