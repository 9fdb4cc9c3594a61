package demo;

public class Counter {
    private int start;
    private int total;

    public Counter(int start, int total) {
        this.start = start;
        total = total;
    }

    public int showBug() {
        int sum = start + total;
        return sum;
    }
}
