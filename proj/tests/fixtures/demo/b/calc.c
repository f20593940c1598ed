#include "calc.h"

static int bias = 1;

int scale(int v) {
  return v * 4;
}

int shift(int v) {
  return v + bias * 2;
}
