int a;
int main() {
  a = a % 0;
  return a;
}
