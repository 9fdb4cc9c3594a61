package demo;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class PrunerTest {
    @Test
    public void removesEvens() {
        assertEquals(2, new Pruner().showBug(4));
    }
}
