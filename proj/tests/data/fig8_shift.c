int a, b, c, d; char e;
void foo () { a = 0; }

int main (){
  unsigned char f;
  for (; b < 1; b++){
    for (e = 1; e >= 0; e--){
      d = 0;
      if (a){ break; }
      f = 179 * e;
      c = f << (-1);
      foo ();
    }
  }
  printf ("%d\n", c);
  return 0;
}
