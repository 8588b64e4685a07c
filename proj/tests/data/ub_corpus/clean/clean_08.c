int g;
void bump() { g++; }
int main() {
  bump();
  bump();
  return g;
}
