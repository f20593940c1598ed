#include "math_utils.h"
#define PI 3.14
double area(double w, double h) {
  return PI * w * h / 4.0;
}
