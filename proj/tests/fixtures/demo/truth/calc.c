#include "calc.h"

static int bias = 3;

int scale(int v) {
  return v * 4 + bias;
}

int shift(int v) {
  return v + bias * 2;
}
