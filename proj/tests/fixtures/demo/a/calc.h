int scale(int v);
int shift(int v);
