int main() {
  int x;
  int y;
  y = x + 1;
  return y;
}
