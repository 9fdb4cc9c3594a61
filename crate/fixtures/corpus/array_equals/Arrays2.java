package demo;

public class Arrays2 {
    public boolean showBug(int size) {
        int[] a = new int[size];
        int[] b = new int[size];
        for (int i = 0; i < size; i++) {
            a[i] = i;
            b[i] = i;
        }
        return a.equals(b);
    }
}
