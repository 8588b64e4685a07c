int a, b;
int main() {
  for (a = 0; a < 4; a++) b += a;
  return b;
}
