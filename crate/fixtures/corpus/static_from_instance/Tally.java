package demo;

public class Tally {
    private static long total = 0L;
    private long mine;

    public Tally(long start) {
        mine = start;
        total = start;
    }

    public long showBug(long amount) {
        mine = mine + amount;
        total = total + amount;
        return total;
    }
}
