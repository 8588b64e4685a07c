int main() {
  int z[] = {1, 2};
  return z[2];
}
