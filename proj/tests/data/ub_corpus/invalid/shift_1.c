int a;
int main() {
  int c = a << (-1);
  return c;
}
