int main() {
  int x = 2;
  goto done;
done:
  return x;
}
