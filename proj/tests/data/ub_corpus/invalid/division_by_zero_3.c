int main() {
  int x = 7;
  x /= 0;
  return x;
}
