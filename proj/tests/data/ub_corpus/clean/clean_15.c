const int k = 6;
int main() {
  int acc = 1;
  int i = 0;
  for (; i < k; i++) acc = acc * 2;
  return acc;
}
