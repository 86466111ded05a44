// Same automaton; on loop exit the state must be below 4, which fails after
// three iterations.
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
  c = nondet();
}
assert(!(s >= 4));
